"""Performance-based sizing of 2D RC frames with shear walls."""
