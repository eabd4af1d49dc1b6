"""Full-scale acceptance tests."""
