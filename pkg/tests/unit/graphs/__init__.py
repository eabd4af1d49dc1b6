"""Unit tests for graphs package."""
