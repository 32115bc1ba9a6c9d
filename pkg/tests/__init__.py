# Test package for sentry-tui
