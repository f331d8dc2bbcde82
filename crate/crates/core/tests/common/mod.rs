#![allow(dead_code)]

pub mod quadrature;
pub mod systems;
