pub mod combtype;
pub mod complex;
pub mod enumeration;
pub mod io;
pub mod linalg;
pub mod polycone;
pub mod render;
pub mod smoothing;
pub mod subdivision;
