"""Unit tests for the groupsim package."""
