"""Test suite for the lottery ticket constructor."""
