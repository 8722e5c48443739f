"""Attribution-aware bidding simulator."""
