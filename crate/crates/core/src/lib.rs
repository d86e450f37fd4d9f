pub mod algebra;
pub mod koszul;
pub mod linalg;
pub mod tensor;
pub mod scalar;
pub mod regularity;
pub mod catalog;
pub mod hecke;
pub mod hochschild;
pub mod io;
