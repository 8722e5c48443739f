"""Services of the attribution bidding simulator: data, attribution, labeling, conversion, bidding and metrics."""
