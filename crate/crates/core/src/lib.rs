//! Exact computation in GGS-groups acting on the p-regular rooted tree.

pub mod cache;
pub mod error;
pub mod ggs;
pub mod group;
pub mod order;
pub mod perm;
pub mod prime;
pub mod quotient;
pub mod tree;
pub mod vector;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use ggs::{abel_coords, in_derived, AbelCoords, Ggs};
pub use group::{log_p, AbelianInvariants, PermGroup, Series};
pub use order::{Budget, Exhausted, InfiniteCertificate, Memo, OrderResult, Step};
pub use perm::{Layout, Perm};
pub use prime::PrimeContext;
pub use quotient::{QuotientRep, DEFAULT_DEGREE_CAP};
pub use tree::{Portrait, SectionTuple, Vertex};
pub use vector::{DefiningVector, TfStatus, VectorClass};
pub use word::{Gen, Word};
