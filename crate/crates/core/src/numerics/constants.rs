//! Stored mathematical constants.
//!
//! Each constant is kept as a 1300-significant-digit decimal string (about 4300 bits),
//! parsed and rounded on first use at a given precision. The unit tests at the
//! bottom recompute every constant by an independent series and compare.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::bigreal::BigReal;

/// Largest working precision (in bits) the stored constants support.
pub const MAX_CONSTANT_BITS: u32 = 4300;

/// Pi, 1300 significant digits.
const PI_DIGITS: &str = concat!(
    "3.1415926535897932384626433832795028841971693993751058209749445923078164",
    "062862089986280348253421170679821480865132823066470938446095505822317253",
    "594081284811174502841027019385211055596446229489549303819644288109756659",
    "334461284756482337867831652712019091456485669234603486104543266482133936",
    "072602491412737245870066063155881748815209209628292540917153643678925903",
    "600113305305488204665213841469519415116094330572703657595919530921861173",
    "819326117931051185480744623799627495673518857527248912279381830119491298",
    "336733624406566430860213949463952247371907021798609437027705392171762931",
    "767523846748184676694051320005681271452635608277857713427577896091736371",
    "787214684409012249534301465495853710507922796892589235420199561121290219",
    "608640344181598136297747713099605187072113499999983729780499510597317328",
    "160963185950244594553469083026425223082533446850352619311881710100031378",
    "387528865875332083814206171776691473035982534904287554687311595628638823",
    "537875937519577818577805321712268066130019278766111959092164201989380952",
    "572010654858632788659361533818279682303019520353018529689957736225994138",
    "912497217752834791315155748572424541506959508295331168617278558890750983",
    "817546374649393192550604009277016711390098488240128583616035637076601047",
    "101819429555961989467678374494482553797747268471040475346462080466842590",
    "69491",
);

/// Log 2, 1300 significant digits.
const LN2_DIGITS: &str = concat!(
    "0.6931471805599453094172321214581765680755001343602552541206800094933936",
    "219696947156058633269964186875420014810205706857336855202357581305570326",
    "707516350759619307275708283714351903070386238916734711233501153644979552",
    "391204751726815749320651555247341395258829504530070953263666426541042391",
    "578149520437404303855008019441706416715186447128399681717845469570262716",
    "310645461502572074024816377733896385506952606683411372738737229289564935",
    "470257626520988596932019650585547647033067936544325476327449512504060694",
    "381471046899465062201677204245245296126879465461931651746813926725041038",
    "025462596568691441928716082938031727143677826548775664850856740776484514",
    "644399404614226031930967354025744460703080960850474866385231381816767514",
    "386674766478908814371419854942315199735488037516586127535291661000710535",
    "582498794147295092931138971559982056543928717000721808576102523688921324",
    "497138932037843935308877482597017155910708823683627589842589185353024363",
    "421436706118923678919237231467232172053401649256872747782344535347648114",
    "941864238677677440606956265737960086707625719918473402265146283790488306",
    "203306114463007371948900274364396500258093651944304119115060809487930678",
    "651588709006052034684297361938412896525565396860221941229242075743217574",
    "890977067526871158170511370091589426654785959648906530584602586683829400",
    "228330",
);

/// Euler's constant, 1300 significant digits.
const EULER_GAMMA_DIGITS: &str = concat!(
    "0.5772156649015328606065120900824024310421593359399235988057672348848677",
    "267776646709369470632917467495146314472498070824809605040144865428362241",
    "739976449235362535003337429373377376739427925952582470949160087352039481",
    "656708532331517766115286211995015079847937450857057400299213547861466940",
    "296043254215190587755352673313992540129674205137541395491116851028079842",
    "348775872050384310939973613725530608893312676001724795378367592713515772",
    "261027349291394079843010341777177808815495706610750101619166334015227893",
    "586796549725203621287922655595366962817638879272680132431010476505963703",
    "947394957638906572967929601009015125195950922243501409349871228247949747",
    "195646976318506676129063811051824197444867836380861749455169892792301877",
    "391072945781554316005002182844096053772434203285478367015177394398700302",
    "370339518328690001558193988042707411542227819716523011073565833967348717",
    "650491941812300040654693142999297779569303100503086303418569803231083691",
    "640025892970890985486825777364288253954925873629596133298574739302373438",
    "847070370284412920166417850248733379080562754998434590761643167103146710",
    "722370021810745044418664759134803669025532458625442225345181387912434573",
    "501361297782278288148945909863846006293169471887149587525492366493520473",
    "243641097268276160877595088095126208404544477992299157248292516251278427",
    "659657",
);
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Named {
    Pi,
    Ln2,
    EulerGamma,
}

fn cached(which: Named, prec: u32) -> BigReal {
    static CACHE: OnceLock<Mutex<HashMap<(Named, u32), BigReal>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("constant cache poisoned").get(&(which, prec)) {
        return v.clone();
    }
    let digits = match which {
        Named::Pi => PI_DIGITS,
        Named::Ln2 => LN2_DIGITS,
        Named::EulerGamma => EULER_GAMMA_DIGITS,
    };
    let value = BigReal::parse(digits, prec).expect("stored constant parses");
    cache
        .lock()
        .expect("constant cache poisoned")
        .entry((which, prec))
        .or_insert(value)
        .clone()
}

pub(super) fn pi(prec: u32) -> BigReal {
    cached(Named::Pi, prec)
}

pub(super) fn ln2(prec: u32) -> BigReal {
    cached(Named::Ln2, prec)
}

pub(super) fn euler_gamma(prec: u32) -> BigReal {
    cached(Named::EulerGamma, prec)
}

#[cfg(test)]
mod tests {
    use super::super::bigreal::atanh_series;
    use super::*;

    fn close(a: &BigReal, b: &BigReal, bits: f64) -> bool {
        (a - b).abs().log2_abs() < -bits
    }

    fn atan_inv(n: i64, prec: u32) -> BigReal {
        // atan(1/n) = sum (-1)^j / ((2j+1) n^(2j+1))
        let x = BigReal::one(prec) / BigReal::from_i64(n, prec);
        let x2 = &x * &x;
        let mut power = x.clone();
        let mut sum = x;
        for j in 1.. {
            power = &power * &x2;
            let term = power.div_int(2 * j + 1);
            if term.log2_abs() < -(prec as f64) - 4.0 {
                break;
            }
            if j % 2 == 1 {
                sum -= &term;
            } else {
                sum += &term;
            }
        }
        sum
    }

    #[test]
    fn pi_matches_machin() {
        let prec = 4200;
        let machin = atan_inv(5, prec).mul_int(16) - atan_inv(239, prec).mul_int(4);
        assert!(close(&pi(prec), &machin, 4190.0));
    }

    #[test]
    fn ln2_matches_atanh_third() {
        let prec = 4200;
        let third = BigReal::one(prec) / BigReal::from_i64(3, prec);
        let series = atanh_series(&third).mul_pow2(1);
        assert!(close(&ln2(prec), &series, 4190.0));
    }

    #[test]
    fn euler_gamma_matches_harmonic_expansion() {
        // H_n - ln n - 1/(2n) + 1/(12n^2) - 1/(120n^4) + 1/(252n^6) at n = 1000
        let prec = 200;
        let n = 1000i64;
        let one = BigReal::one(prec);
        let mut h = BigReal::zero(prec);
        for k in 1..=n {
            h += &(&one / &BigReal::from_i64(k, prec));
        }
        // ln 1000 = 3 ln 10 = 3 (ln 2 + ln 5), ln 5 = 2 ln 2 + ln(5/4)
        let ln2_series = atanh_series(&(&one / &BigReal::from_i64(3, prec))).mul_pow2(1);
        let ln5_4 = atanh_series(&(&one / &BigReal::from_i64(9, prec))).mul_pow2(1);
        let ln1000 = (ln2_series.mul_int(3) + ln5_4).mul_int(3);
        let nn = BigReal::from_i64(n, prec);
        let corr = &one / &nn.mul_int(2) - &one / &nn.powi(2).mul_int(12) + &one / &nn.powi(4).mul_int(120)
            - &one / &nn.powi(6).mul_int(252);
        let gamma = h - ln1000 - corr;
        let diff = (&gamma - &euler_gamma(prec)).abs().to_f64();
        assert!(diff < 1e-10, "gamma deviates by {diff:e}");
    }
}
