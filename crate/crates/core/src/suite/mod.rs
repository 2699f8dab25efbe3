//! Seeded benchmark instances in the style of the CEC 2017 and CEC 2022 suites.
//!
//! Shifts, rotations and dimension permutations are generated from a seed
//! instead of read from the official data files, so instances keep the
//! problem classes of the original suites but not their exact landscapes.

mod functions;
mod instance;

pub use functions::{base_function, BaseFn};
pub use instance::{
    make_instance, make_instance_with_rotation_seed, random_rotation, BenchmarkInstance, FunctionClass,
    InstanceDescriptor, Manifest, Suite,
};
