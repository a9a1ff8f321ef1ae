//! Fixed-size payloads that can live inside an arena node.

use std::fmt::Debug;

/// A copyable value with a fixed little-endian byte encoding.
pub trait Value: Copy + PartialEq + Debug {
    const SIZE: usize;

    /// Writes exactly `SIZE` bytes into `out`.
    fn encode(&self, out: &mut [u8]);

    /// Reads a value from exactly `SIZE` bytes.
    fn decode(bytes: &[u8]) -> Self;
}

macro_rules! int_value {
    ($($t:ty),*) => {$(
        impl Value for $t {
            const SIZE: usize = std::mem::size_of::<$t>();

            fn encode(&self, out: &mut [u8]) {
                out.copy_from_slice(&self.to_le_bytes());
            }

            fn decode(bytes: &[u8]) -> Self {
                <$t>::from_le_bytes(bytes.try_into().expect("value width"))
            }
        }
    )*};
}

int_value!(u8, u16, u32, u64, u128, i8, i16, i32, i64, i128, f32, f64);

impl<const N: usize> Value for [u8; N] {
    const SIZE: usize = N;

    fn encode(&self, out: &mut [u8]) {
        out.copy_from_slice(self);
    }

    fn decode(bytes: &[u8]) -> Self {
        bytes.try_into().expect("value width")
    }
}

impl Value for () {
    const SIZE: usize = 0;

    fn encode(&self, _out: &mut [u8]) {}

    fn decode(_bytes: &[u8]) -> Self {}
}
