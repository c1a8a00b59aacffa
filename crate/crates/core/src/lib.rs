pub mod error;
pub mod linalg;
pub mod ring;
pub mod grp;
pub mod permod;
pub mod chain;
pub mod homotopy;
pub mod koszul;
pub mod twisted;
pub mod spectrum;
pub mod certificate;
pub mod cli;
