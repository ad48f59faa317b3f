pub mod cli;
pub mod dual;
pub mod geometry;
pub mod oracle;
pub mod planar;
pub mod primal;
pub mod topology;
