#![allow(clippy::excessive_precision)]

//! 21-point Gauss–Kronrod rule with the embedded 10-point Gauss rule.

/// Kronrod abscissae on [0, 1); odd indices are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Apply the rule on `[a, b]` to a vector-valued integrand.
/// Returns per-component `(value, error)`; `Err(x)` if `f(x)` is not finite.
pub(crate) fn gk21<const N: usize, F>(f: &F, a: f64, b: f64) -> Result<([f64; N], [f64; N]), f64>
where
    F: Fn(f64) -> [f64; N] + ?Sized,
{
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let dhlgth = hlgth.abs();

    let mut fv1 = [[0.0; N]; 10];
    let mut fv2 = [[0.0; N]; 10];
    let eval = |x: f64| -> Result<[f64; N], f64> {
        let v = f(x);
        if v.iter().all(|c| c.is_finite()) {
            Ok(v)
        } else {
            Err(x)
        }
    };

    let fc = eval(centr)?;
    let mut resg = [0.0; N];
    let mut resk = [0.0; N];
    let mut resabs = [0.0; N];
    for c in 0..N {
        resk[c] = WGK[10] * fc[c];
        resabs[c] = resk[c].abs();
    }
    for j in 0..10 {
        let absc = hlgth * XGK[j];
        let f1 = eval(centr - absc)?;
        let f2 = eval(centr + absc)?;
        for c in 0..N {
            let s = f1[c] + f2[c];
            if j % 2 == 1 {
                resg[c] += WG[j / 2] * s;
            }
            resk[c] += WGK[j] * s;
            resabs[c] += WGK[j] * (f1[c].abs() + f2[c].abs());
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }

    let mut value = [0.0; N];
    let mut err = [0.0; N];
    for c in 0..N {
        let reskh = 0.5 * resk[c];
        let mut resasc = WGK[10] * (fc[c] - reskh).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((fv1[j][c] - reskh).abs() + (fv2[j][c] - reskh).abs());
        }
        value[c] = resk[c] * hlgth;
        let resabs_c = resabs[c] * dhlgth;
        resasc *= dhlgth;
        let mut e = ((resk[c] - resg[c]) * hlgth).abs();
        if resasc != 0.0 && e != 0.0 {
            e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
        }
        if resabs_c > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            e = e.max(50.0 * f64::EPSILON * resabs_c);
        }
        err[c] = e;
    }
    Ok((value, err))
}
