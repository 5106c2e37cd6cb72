//! Structure invariants of finitely presented modules over Iwasawa algebras
//! Λ = Z_p[[b_1, …, b_r]] and over rule-presented uniform extra-powerful
//! groups.

pub mod budget;
pub mod gb;
pub mod poly;
pub mod ring;
pub mod graded;
pub mod sbasis;
pub mod homology;
pub mod invariants;
pub mod verify;
pub mod cli;
