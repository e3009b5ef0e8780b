pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod scenarios;
pub mod tables;
pub mod verify;
