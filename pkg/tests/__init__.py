"""Tests for gls-normal."""
