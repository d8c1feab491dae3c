pub mod braids;
pub mod chains;
pub mod exact_linalg;
pub mod injwords;
pub mod ssets;
pub mod stability;
