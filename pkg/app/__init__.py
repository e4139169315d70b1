"""PreFIQs: pruning-induced embedding drift as an image-utility score."""
