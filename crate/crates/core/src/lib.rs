pub mod error;
pub mod group;
pub mod linalg;
pub mod characters;
pub mod representations;
pub mod harmonics;
pub mod multiregister;
pub mod kickback;
mod young;
