"""Headless VR front-touch interaction engine and study harness."""

__version__ = "0.1.0"
