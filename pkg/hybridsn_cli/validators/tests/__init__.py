"""Tests for the validators module."""
