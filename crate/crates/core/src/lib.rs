pub mod conormal;
pub mod deform;
pub mod exactalg;
mod memo;
pub mod rings;
pub mod varieties;
