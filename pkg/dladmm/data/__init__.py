"""IDX ingestion and dataset preparation."""
