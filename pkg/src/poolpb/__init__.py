"""Participatory budgeting with pooled private budgets."""
