"""External detector clients, byte transports and the line protocol codec."""
