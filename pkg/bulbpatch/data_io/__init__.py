"""File formats: grayscale images, patch parameter files, dataset manifests and result tables."""
