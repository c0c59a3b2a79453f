/// Boxes, priors and minima from an interior-point exponential-cone solve
/// (relative-entropy formulation, gap and feasibility tolerances 1e-12).
/// `(box [a][b][s], prior, minimum in nats)`.
pub type Instance = (&'static [&'static [&'static [f64]]], &'static [f64], f64);

pub const CONIC_REFERENCE: &[Instance] = &[
    (
        &[
            &[&[0.39496313357121954, 0.6050368664287804], &[0.5521856815055659, 0.44781431849443415]],
            &[&[0.7147722223210311, 0.2852277776789689], &[0.29486200098311405, 0.705137999016886]],
        ],
        &[0.46014959470899236, 0.5398504052910077],
        0.052519242164534186,
    ),
    (
        &[
            &[&[0.1741855721982991, 0.8258144278017009], &[0.24926113350225995, 0.7507388664977401]],
            &[&[0.3571282552731739, 0.6428717447268261], &[0.6991264610879272, 0.3008735389120728]],
            &[&[0.46689207778890207, 0.5331079222110979], &[0.28437047141230787, 0.7156295285876922]],
        ],
        &[0.48077401686346877, 0.09740266242017516, 0.42182332071635603],
        0.08102982465109351,
    ),
    (
        &[
            &[
                &[0.5020215422995729, 0.49797845770042726],
                &[0.7397827768742741, 0.26021722312572604],
                &[0.48171002742271607, 0.5182899725772838],
            ],
            &[
                &[0.6723583505597349, 0.32764164944026514],
                &[0.12500935856208897, 0.874990641437911],
                &[0.5637008991966804, 0.4362991008033195],
            ],
        ],
        &[0.3948234686640452, 0.6051765313359548],
        0.2033704593089234,
    ),
    (
        &[
            &[
                &[0.9296150798215527, 0.0703849201784473],
                &[0.11169187689303846, 0.8883081231069616],
                &[0.3422795776138689, 0.657720422386131],
            ],
            &[
                &[0.5273172915069904, 0.4726827084930096],
                &[0.219726204462189, 0.7802737955378111],
                &[0.6717637968069639, 0.3282362031930362],
            ],
            &[
                &[0.14124542210886176, 0.8587545778911383],
                &[0.5737396796915151, 0.42626032030848493],
                &[0.2512041494739951, 0.748795850526005],
            ],
        ],
        &[0.10989837863639397, 0.40491784532666186, 0.4851837760369442],
        0.22345926087840295,
    ),
    (
        &[
            &[
                &[0.5289565710453791, 0.24315543762009084, 0.22788799133453005],
                &[0.22998059933545068, 0.3801275828148645, 0.3898918178496848],
            ],
            &[
                &[0.373265759744881, 0.4078674406836651, 0.21886679957145386],
                &[0.7311123060942452, 0.18812871530140932, 0.08075897860434543],
            ],
        ],
        &[0.6231284341382205, 0.37687156586177945],
        0.13182611854301896,
    ),
    (
        &[
            &[
                &[0.09018611858679527, 0.336716627842735, 0.5730972535704698],
                &[0.3816228757756412, 0.32575113810912015, 0.2926259861152387],
            ],
            &[
                &[0.2679555813312607, 0.43729098941929306, 0.29475342924944614],
                &[0.17861155031285342, 0.3369749444407536, 0.48441350524639293],
            ],
            &[
                &[0.5710541918784532, 0.11589881250741647, 0.3130469956141304],
                &[0.17382062456796346, 0.5314514911416772, 0.2947278842903593],
            ],
        ],
        &[0.39946616383884465, 0.31992047025107334, 0.2806133659100819],
        0.1220412486333261,
    ),
    (
        &[
            &[&[0.7889312440395154, 0.21106875596048447], &[0.535638897603954, 0.464361102396046]],
            &[&[0.07021635734188508, 0.929783642658115], &[0.3454490880263601, 0.6545509119736399]],
            &[&[0.5709960710448995, 0.4290039289551006], &[0.24377185539349805, 0.756228144606502]],
            &[&[0.8446490493346733, 0.15535095066532656], &[0.14684055009530503, 0.853159449904695]],
        ],
        &[0.2709013866931513, 0.2929938438038164, 0.15941522814837128, 0.27668954135466106],
        0.29464085926026323,
    ),
    (
        &[
            &[
                &[0.341158031790721, 0.30619141849430026, 0.35265054971497867],
                &[0.3843374340638764, 0.49024804375703585, 0.12541452217908775],
                &[0.39054048266848074, 0.2206649166330233, 0.388794600698496],
            ],
            &[
                &[0.23112325033684267, 0.3461207738346493, 0.42275597582850805],
                &[0.21635705078939904, 0.3227797111581825, 0.4608632380524184],
                &[0.07932012465014253, 0.42795806695621014, 0.4927218083936474],
            ],
        ],
        &[0.4777238674847706, 0.5222761325152294],
        0.10729658905689893,
    ),
];
