//! Size caps bounding every exhaustive enumeration.

use std::sync::OnceLock;

/// Environment variable overriding the default caps, e.g.
/// `TOPOSCALC_SIZE_CAP="arrows=128,elements=32,sieves=65536"`.
/// A bare number sets the sieve-set enumeration cap alone.
pub const SIZE_CAP_ENV: &str = "TOPOSCALC_SIZE_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeCaps {
    /// Maximum number of arrows in a category (after saturation).
    pub arrows: usize,
    /// Maximum carrier size of a presheaf at a single object.
    pub elements: usize,
    /// Maximum number of candidates in any sieve-set, subobject or
    /// hom-set enumeration.
    pub enumeration: u128,
}

impl Default for SizeCaps {
    fn default() -> Self {
        SizeCaps { arrows: 256, elements: 64, enumeration: 1 << 20 }
    }
}

impl SizeCaps {
    /// Parses the override syntax accepted in [`SIZE_CAP_ENV`].
    pub fn parse(spec: &str) -> Option<SizeCaps> {
        let mut caps = SizeCaps::default();
        let spec = spec.trim();
        if let Ok(n) = spec.parse::<u128>() {
            caps.enumeration = n;
            return Some(caps);
        }
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=')?;
            let value = value.trim();
            match key.trim() {
                "arrows" => caps.arrows = value.parse().ok()?,
                "elements" => caps.elements = value.parse().ok()?,
                "sieves" | "enumeration" => caps.enumeration = value.parse().ok()?,
                _ => return None,
            }
        }
        Some(caps)
    }

    /// Caps in effect for this process: defaults, overridden by the environment.
    pub fn current() -> SizeCaps {
        static CAPS: OnceLock<SizeCaps> = OnceLock::new();
        *CAPS.get_or_init(|| std::env::var(SIZE_CAP_ENV).ok().and_then(|s| SizeCaps::parse(&s)).unwrap_or_default())
    }

    pub fn check_enumeration(&self, what: &'static str, count: u128) -> crate::Result<()> {
        if count > self.enumeration {
            return Err(crate::Error::SizeCapExceeded { what, count, cap: self.enumeration });
        }
        Ok(())
    }

    pub fn check_elements(&self, what: &'static str, count: usize) -> crate::Result<()> {
        if count > self.elements {
            return Err(crate::Error::SizeCapExceeded { what, count: count as u128, cap: self.elements as u128 });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides() {
        assert_eq!(SizeCaps::parse("12").unwrap().enumeration, 12);
        let caps = SizeCaps::parse("arrows=8, elements=3").unwrap();
        assert_eq!((caps.arrows, caps.elements), (8, 3));
        assert_eq!(caps.enumeration, 1 << 20);
        assert!(SizeCaps::parse("bogus=1").is_none());
    }
}
