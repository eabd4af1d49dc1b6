"""Unit tests for nodes package."""
