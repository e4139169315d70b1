"""Services that load artifacts, run the pipeline steps and write results."""
