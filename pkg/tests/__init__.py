"""Tests for RFF QRNG CLI."""
