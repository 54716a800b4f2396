"""Tests for SwiftQuantum Gateway Agent."""
