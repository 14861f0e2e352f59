"""Forecast-aware cooperative multi-robot planning on temporal graphs."""
