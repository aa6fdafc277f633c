//! Browser bindings for the nesting spectrum.
