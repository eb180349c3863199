pub mod linalg;
pub mod linrep;
pub mod qfield;
pub mod quat;
pub mod ravel;
pub mod hyp;
pub mod crystal;
pub mod weeks;
pub mod data;
