"""ZF rate region of the 2x2 VLC broadcast channel."""
