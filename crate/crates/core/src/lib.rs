pub mod exact;
pub mod formula;
pub mod rootsys;
pub mod reflgroup;
pub mod symcat;
pub mod hermann;
pub mod focal;
pub mod adnum;
