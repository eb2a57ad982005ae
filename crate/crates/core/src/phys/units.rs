//! Reporting-unit conversions. All of them live here so that no other module
//! multiplies by a bare `1e9`.

const NM_PER_M: f64 = 1e9;
const US_PER_S: f64 = 1e6;
const NM2_PER_M2: f64 = 1e18;

#[inline]
pub fn m_to_nm(x: f64) -> f64 {
    x * NM_PER_M
}

#[inline]
pub fn nm_to_m(x: f64) -> f64 {
    x / NM_PER_M
}

#[inline]
pub fn s_to_us(t: f64) -> f64 {
    t * US_PER_S
}

#[inline]
pub fn us_to_s(t: f64) -> f64 {
    t / US_PER_S
}

#[inline]
pub fn m2_to_nm2(v: f64) -> f64 {
    v * NM2_PER_M2
}

#[inline]
pub fn nm2_to_m2(v: f64) -> f64 {
    v / NM2_PER_M2
}
