pub mod poly;
pub mod recurrence;
pub mod roots;
pub mod zeroing;
pub mod analysis;
pub mod lab;
pub mod cli;
