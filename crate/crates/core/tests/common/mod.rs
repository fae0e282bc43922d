//! Reference values shared by the integration tests.

#![allow(dead_code)]

pub struct StatFixture {
    pub groups: &'static [&'static [f64]],
    pub h: f64,
    pub h_p: f64,
    pub f_mean: f64,
    pub f_mean_p: f64,
    pub f_median: f64,
    pub f_median_p: f64,
}

// Values from scipy.stats (kruskal, levene with center='mean' and 'median').
pub const STAT_FIXTURES: &[StatFixture] = &[
    StatFixture {
        groups: &[&[1.0, 0.0, -1.9, -1.2, -0.1, -0.8, -1.1, -0.9, -1.3], &[-1.4, 3.3, 0.2, -0.5, -1.4, -2.2]],
        h: 0.05565493937587119,
        h_p: 0.813500187293251,
        f_mean: 2.516801588513825,
        f_mean_p: 0.13665388760789057,
        f_median: 1.7194106962663966,
        f_median_p: 0.21245764304734274,
    },
    StatFixture {
        groups: &[&[-0.31102823081284037, -0.5337137808428835, 2.19004049428291, 0.03321405624106288, -0.9814007310639087, -0.8712080345287688, 1.9241272088321253, -0.6172165902242103], &[0.12238238972123228, -0.17913313076696674, 1.0551127138729441, -0.16941041162554177, 1.4213765448020212, -1.3172382317310032, 1.6926577261826015, 0.7703818823260786, 0.6026218573214056, -1.6674127976299438, -0.4099429877318204], &[-1.7804303978127844, 1.254773527210411, 1.8923185025375013, 0.2606718826425772, 2.3701374790388425, -1.823995486611226, 2.94717943910438, 1.381194440750504, -1.8831509142080471, -3.2082233728147624]],
        h: 0.08764890282131432,
        h_p: 0.957121964136582,
        f_mean: 5.555910243003407,
        f_mean_p: 0.009794768128769392,
        f_median: 3.584449105105568,
        f_median_p: 0.04218421107426167,
    },
    StatFixture {
        groups: &[&[-1.4, 0.0, 2.1, 1.2, 0.3, 1.6, -0.3], &[0.2, 0.9, 0.6, 0.8, 1.3, 2.0, 3.8, 2.4, 1.7, 0.9], &[2.0, 1.6, -2.3, -0.1], &[-3.3, 1.6, 3.9, -0.6, -1.3, 6.8, 3.5, 1.8, 0.7]],
        h: 1.9929956648880598,
        h_p: 0.5738617525751919,
        f_mean: 2.9861415049654476,
        f_mean_p: 0.049443522981174506,
        f_median: 2.730106665119888,
        f_median_p: 0.06429505054228832,
    },
    StatFixture {
        groups: &[&[1.064499751344398, 0.6434568107095195, 0.25318271753960425, -0.6624618035761772, -0.3384424530419031, -0.6436016576438102, 0.4797755590759844, -1.5978625144508976, 0.5065413858888115], &[-1.0194882740571773, -0.45177084803743245, 0.061110120345037655, 0.9457990674637752], &[0.7079703933160372, 1.8089627296217081, 2.3005564846710187, -0.963910881056598, 1.1880940557589852, 0.0032555786476643643], &[-1.9791701308953267, -1.0947151064051277, -1.9933956408237232, -0.4002924956731729, 0.12129792836506295, 0.5017261693155638, 3.746929124232363, -1.7628459920646955], &[-4.371267614500232, 4.9986234394283455, -2.4420922545421346, 4.429663528323356, 3.7130610253107754, -3.3482154939407094, -3.843061763189829, -4.508869744331622, -6.371745509737423]],
        h: 4.822947947947952,
        h_p: 0.30595124321015255,
        f_mean: 11.021378058632466,
        f_mean_p: 1.1203001917712238e-05,
        f_median: 2.860648917745251,
        f_median_p: 0.039756448625142105,
    },
    StatFixture {
        groups: &[&[0.9, 0.2, -0.9, 0.8, -0.4, -1.7, -0.8, -0.6, -0.9], &[1.0, 4.4, 1.6, 2.5, 2.0, 1.1, 0.3, 0.7]],
        h: 9.49311520109066,
        h_p: 0.002062443419751168,
        f_mean: 0.755024769591784,
        f_mean_p: 0.3985803314647248,
        f_median: 0.5843590438837359,
        f_median_p: 0.4564668210805227,
    },
    StatFixture {
        groups: &[&[-2.1469854725073305, 1.9320584824887224, 0.15748562529898052, 1.656435104279306, -0.2424143051198129], &[1.1900173614738025, -1.2060039551960777, -3.618237483855602, 0.03585680184710871], &[-1.8738589988252021, 3.5469886617206825, -1.769622385838175, -1.7612287424017186, -0.8839094657388433, 1.1564444688738393]],
        h: 0.7650000000000006,
        h_p: 0.6821538909764521,
        f_mean: 0.3550969051987568,
        f_mean_p: 0.7082301951722633,
        f_median: 0.09117077121476078,
        f_median_p: 0.9134880057182541,
    },
    StatFixture {
        groups: &[&[-1.4, 0.5, 1.3, -1.0, -2.9, 0.9, 0.5, 0.3, 0.7, -1.1, -1.3], &[-1.4, 0.1, -0.5, 0.5, 1.3, -1.3, -0.6, 0.3, -0.3, -0.6, 1.4], &[-2.2, -1.6, -2.2, 3.5, -2.2, -2.3, 0.8, -2.5, 1.5], &[-1.4, -1.0, -2.0, -3.3, 0.9, -4.3, -3.1, 0.6, 1.1, -1.5]],
        h: 4.118138283903419,
        h_p: 0.24898666158781937,
        f_mean: 3.2469162543657197,
        f_mean_p: 0.03265623138548069,
        f_median: 0.839237916968272,
        f_median_p: 0.4810800073602115,
    },
    StatFixture {
        groups: &[&[0.8374248757465796, 0.4930207283274339, -0.832468317801326, -0.8453627117050427, 0.8531631421062844, -0.5644503172850033, -0.6025236322892438, -0.3965561432225315, -1.800757536986212], &[1.4493412115683737, 3.1412309832325755, 0.7046011253206246, 2.935695951658297], &[-2.5404388463496916, 0.2411919758491849, 0.6145604207306853, -1.5178871500082893, 4.694187326492773, 0.8170696071729318, -0.9465600543756311, -1.1967512454402596, -1.2386176013044459], &[-2.475376775120903, -1.6897349096282945, 2.416945671886836, -2.089227303732722, 2.0410446953642527, -1.9847306445027857], &[-0.8589249059289072, 4.151934073758495, -2.772300779046687, -1.37091038232082, 5.2816465157946775]],
        h: 5.745038621509195,
        h_p: 0.2190152250468069,
        f_mean: 5.697467981659319,
        f_mean_p: 0.0017441307559532915,
        f_median: 1.3409835250848847,
        f_median_p: 0.27945974601864315,
    },
    StatFixture {
        groups: &[&[-0.4, -0.6, 0.4, -1.5], &[-1.7, 0.5, 2.6, 2.2, 0.7, 0.3, 0.5, -3.0, -0.9]],
        h: 0.859504132231409,
        h_p: 0.353877493843589,
        f_mean: 2.0013729357620753,
        f_mean_p: 0.18483480202534916,
        f_median: 1.2535095711082516,
        f_median_p: 0.2867344619425804,
    },
    StatFixture {
        groups: &[&[0.39304559149815366, -1.1686095837249122, -0.19779778602866083, 1.3550139936648218], &[2.587716629808878, 0.7571277611445186, 2.849579328107727, -0.7090861898274641], &[-1.2359557940360955, -0.8685093302376425, -0.5631612301340702, 1.938232104956826]],
        h: 2.57692307692308,
        h_p: 0.2756946025335608,
        f_mean: 0.7723023611786047,
        f_mean_p: 0.4902921310390555,
        f_median: 0.4982234114570368,
        f_median_p: 0.6234273086405295,
    },
    StatFixture {
        groups: &[&[-1.0, -0.8, 1.6, 0.3, -2.2, -0.7, -0.2, 1.4, -0.9, 0.2], &[0.8, 1.2, -2.6, -0.7, 0.9], &[3.4, 0.1, 0.3, 1.1, 0.5, 0.9, 3.7], &[1.8, -3.2, 5.1, 1.6]],
        h: 5.250434049004757,
        h_p: 0.1543511789570095,
        f_mean: 1.662629577859608,
        f_mean_p: 0.2040444346918989,
        f_median: 0.8875589890471212,
        f_median_p: 0.46295150627385795,
    },
    StatFixture {
        groups: &[&[0.3709540438839807, -0.5383038887429622, -2.344531604803431, -0.1568471468502655, 0.4567875906597478, -1.5758492244176208, -0.7953037411511361], &[-0.45814499597520186, 0.7826432766087501, -1.6028243656200352, 1.8923734842304398, 2.494361620810941, 3.3214418941835193, 0.3047917159080116, 1.7459771206892718, 1.64924085982841, 2.2824459017730336, 2.9470028911069295], &[3.9598486919439475, -0.4379083867193907, -0.6314422804294388, -2.1165269926817327, 0.40557361484685084, 0.7602370480101173], &[6.151824952495146, -1.0145957636208287, 4.571188170793066, 1.9900512477461667, 5.016448353440843, -4.435443328255238, 0.04334139871677145, 2.8381329661333874, 3.973824008203558, 5.304873318837636], &[4.256843635227882, 8.271831048556711, -0.9665311919126132, -1.7841339730334256, 3.1922770760082653]],
        h: 7.814735264735262,
        h_p: 0.09860533039032493,
        f_mean: 3.692269645093133,
        f_mean_p: 0.013348553263264007,
        f_median: 2.5684517724450844,
        f_median_p: 0.05556487150949536,
    },
    StatFixture {
        groups: &[&[-1.4, 2.0, 1.6, -1.1], &[1.5, -0.2, -0.0, 1.9, 0.5, 0.2, 0.9, 0.3, 1.8, 0.6, 0.7]],
        h: 0.06818181818182012,
        h_p: 0.7940026801927591,
        f_mean: 21.128397707285025,
        f_mean_p: 0.0005008169402476798,
        f_median: 16.980578701262175,
        f_median_p: 0.001205386470995672,
    },
    StatFixture {
        groups: &[&[0.646356888309818, -1.1429097346429724, 1.3406630934926658, 1.699373731993562, -0.7133047917763722], &[-1.7804613103464402, 3.0087303321460768, 0.5970895511386696, 0.5452609756992812, -1.0307669756981634, -0.3594920164677718, 1.4548572784515692, -2.469992746220516, -0.5293577657550603], &[4.703435660562535, -0.5989838934424981, 0.7973295141793301, -0.15016260440831064, 2.3024485793871063, -1.0780493450497173, 2.202117769295393]],
        h: 1.6044526901669798,
        h_p: 0.4483297155359134,
        f_mean: 0.6603214473334469,
        f_mean_p: 0.5287597452258014,
        f_median: 0.4972782717812057,
        f_median_p: 0.6162970900733318,
    },
    StatFixture {
        groups: &[&[-0.3, 1.6, -1.1, -0.8], &[0.2, 0.8, 1.4, 0.1, 1.2, -1.8, -1.6, 2.4, 0.5, -1.9], &[0.8, 2.1, 1.6, -1.5], &[4.1, 6.8, -1.3, 2.2, 6.5, 0.4, 4.1, 3.9]],
        h: 7.763304243668728,
        h_p: 0.05116535888011681,
        f_mean: 1.866484983093612,
        f_mean_p: 0.16478001742580856,
        f_median: 1.0954369214109971,
        f_median_p: 0.3719580461412288,
    },
    StatFixture {
        groups: &[&[-0.15961558075408253, 1.6935429634583772, 0.7401093381943743, 0.2080374840258559, -1.2014847543177598, 0.1674991964332216, -1.3948887318375167, 0.7067286145641904, -0.4345603225059695, 0.7635547569213142], &[-0.5724111799241358, -0.463065730706121, 0.15430055582354507, -3.3748135519318776, -1.9933719143064725, 0.1579720668141362, 2.3339259229710354], &[2.400705199444436, -1.7246448808559998, 1.8381013940395756, -0.16458528523264895], &[1.4287129459188819, 0.5910950257875326, -1.1854830385338717, -1.219300539977827, -0.5908962792693699, -0.5904981658847502], &[-10.99891672863504, -0.3403006948216488, -1.223047683533445, -4.742821717892554, -3.9993652412366836, 0.8796009652893588]],
        h: 5.8018843901196675,
        h_p: 0.2144402610589111,
        f_mean: 3.9001813570545,
        f_mean_p: 0.012193434233731731,
        f_median: 3.5674942829611282,
        f_median_p: 0.01793232978548984,
    },
    StatFixture {
        groups: &[&[-0.2, -0.5, 0.7, -0.8, 0.4, 0.4, -0.2, -0.7], &[-0.2, -0.9, -1.4, -0.9, -0.4, -0.9, 1.3, -0.4]],
        h: 2.1940298507462708,
        h_p: 0.1385464150989156,
        f_mean: 0.17062284439034267,
        f_mean_p: 0.6858157008399045,
        f_median: 0.2243767313019392,
        f_median_p: 0.6430270474450982,
    },
    StatFixture {
        groups: &[&[-0.7712311269694263, 0.7701178812114271, -0.21711088036178072, -0.4829240436005629, 0.5434787675853577], &[-0.5151329358786584, 0.1684151537572005, 1.4099286181600172, -0.3298484063413146, 1.3927869373542152, -1.6489643223851793, -0.047793946350685235, 0.5811976623537286, 1.0052999651419456], &[0.9667636234434207, 1.0413618696063405, -2.057143062082747, 2.648814087016559, 0.6890063596778169, 0.6979487128957155, 2.152170955406753]],
        h: 3.2296846011131777,
        h_p: 0.19892203786209522,
        f_mean: 0.40379374755746733,
        f_mean_p: 0.6736816654043657,
        f_median: 0.425980375335529,
        f_median_p: 0.6595440455853374,
    },
    StatFixture {
        groups: &[&[0.6, 1.4, -0.3, 0.2, 1.9, -0.9, -0.3, 0.5, 0.4, -0.8, -0.2], &[-0.1, -1.0, 1.2, 1.7, 0.8, -1.1], &[-0.1, 1.3, 3.6, -3.4, -3.9, 1.6, -3.7], &[0.1, -1.9, 0.1, 0.5, -2.0, -2.5, 1.0]],
        h: 1.2175914279425215,
        h_p: 0.7487883263690378,
        f_mean: 11.713924953350148,
        f_mean_p: 4.2603308330904996e-05,
        f_median: 5.758900506600073,
        f_median_p: 0.003522810537251204,
    },
    StatFixture {
        groups: &[&[-1.6924202470958962, 0.7936331264410884, 0.04382776659372707, -1.3277348343915287, -0.9671676472896267, -0.3965908482392503, 1.3633045252868214, -0.34763019990564303, -1.6869941439808842], &[-0.7547527449364828, -0.9194150513782069, -2.6180958954312494, 2.013697625549787], &[-2.6091820867578117, 3.7317657971184395, -1.514664913181314, -0.05200436524211682, 0.8834062223666445, -0.099241760584166, 0.2888887199135044], &[0.27866078923573534, -0.16225931192385934, -1.214248906875711, 5.963498654850833, -0.0017876461287402723, -2.2172825943332204, -1.0932165112635313, 0.5521035873866296], &[2.071264247748981, -2.230558403880363, 9.806881587440932, 4.066672751882758, 4.955284681574156]],
        h: 4.715431627196324,
        h_p: 0.31776127420114153,
        f_mean: 1.5408818229992975,
        f_mean_p: 0.21756507064793182,
        f_median: 1.3460008759238686,
        f_median_p: 0.277718997135233,
    },
];
