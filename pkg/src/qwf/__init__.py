"""Extended quantum walk front dynamics."""
