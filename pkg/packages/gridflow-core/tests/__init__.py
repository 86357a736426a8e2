"""Tests for gridflow."""
