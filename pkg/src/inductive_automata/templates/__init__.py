"""Text templates rendered with jinja2."""
