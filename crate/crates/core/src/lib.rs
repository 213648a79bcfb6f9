pub mod field;
pub mod mat;
pub mod poly;
pub mod perm;
pub mod group;
pub mod classes;
pub mod psub;
pub mod cyc;
pub mod chartab;
pub mod reduction;
pub mod modrep;
pub mod blocks;
pub mod harness;
