"""Unit tests for sts_tests package."""
