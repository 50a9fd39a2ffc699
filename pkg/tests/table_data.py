"""Published reference rules used by the acceptance suite.

Each entry is a (node, weight) pair for the endpoint-singular test families:
family "example1" is beta = -1/4 with exponents k + 2/3, k - 2/3 and family
"example2" is beta = -1/3 with the doubled exponents k - 1/2.  Values are
frozen at 17 significant digits.
"""

EXAMPLE1_RULE_20 = [
    (2.315776697282891e-06, 0.0009422243358354125),
    (0.0002723317482437818, 0.005242825253424262),
    (0.0018028430213927918, 0.012949690421473462),
    (0.00625861723244955, 0.023479387650276507),
    (0.01577828005938683, 0.03620714763805282),
    (0.032714449729529464, 0.05037387255828325),
    (0.05933800650508155, 0.06512543060034237),
    (0.0975358234134016, 0.07955830001305947),
    (0.14853234267777532, 0.09276797527963412),
    (0.21266338866366832, 0.10389748261138633),
    (0.2892259104132531, 0.11218341981654856),
    (0.3764203822682858, 0.11699708689403455),
    (0.4713940160580535, 0.11787854613502737),
    (0.5703835587468477, 0.11456183436550083),
    (0.668947143657257, 0.10699002517468645),
    (0.7622663002738301, 0.09531938199793678),
    (0.8454925905754925, 0.07991243733581409),
    (0.9141090865885054, 0.06132053399855362),
    (0.9642758005329216, 0.040258021409587424),
    (0.9931365065928117, 0.0175937700118111),
]

EXAMPLE1_RULE_40 = [
    (1.5187265199530925e-07, 0.0001221335532212474),
    (1.7992560515276967e-05, 0.0006860500709771373),
    (0.00012069214706402429, 0.001722892392884994),
    (0.00042706310022074624, 0.003200259893930648),
    (0.0011039676484141875, 0.005095659649118074),
    (0.0023612508697757515, 0.007380445040336262),
    (0.004445336885042283, 0.010020032335832917),
    (0.007631641509330646, 0.012974358916941377),
    (0.012215994413850436, 0.016198429091116944),
    (0.01850528892557954, 0.019642930054004918),
    (0.026807597817191973, 0.02325490790611385),
    (0.03742200786529267, 0.02697849410399485),
    (0.05062843420555685, 0.030755672338654855),
    (0.06667767738108353, 0.03452707537277569),
    (0.08578198141366436, 0.03823280099351797),
    (0.10810634033123627, 0.041813235992838205),
    (0.13376078361624985, 0.04520987698701981),
    (0.16279384840367642, 0.048366136936514245),
    (0.19518741849553753, 0.051228126426811106),
    (0.23085307803670563, 0.05374539911853572),
    (0.26963009178752406, 0.055871651265625516),
    (0.31128508519477094, 0.05756536582749479),
    (0.3555134568340284, 0.058790392455852776),
    (0.40194251424969035, 0.05951645550893218),
    (0.4501362827518852, 0.05971958322326181),
    (0.4996018963389174, 0.05938245224244178),
    (0.549797441570076, 0.05849464284911058),
    (0.6001410898385048, 0.05705280145493799),
    (0.650021321938042, 0.055060708157983945),
    (0.6988080218413708, 0.05252924846094922),
    (0.7458641948610214, 0.04947628954230116),
    (0.7905580493795039, 0.045926462772571036),
    (0.8322751715111766, 0.041910855467128326),
    (0.8704305186770162, 0.03746661619176586),
    (0.9044799613506451, 0.032636479428631744),
    (0.9339311125723491, 0.02746821769741007),
    (0.9583532040614056, 0.022014035553052494),
    (0.977385807065296, 0.016329952018268864),
    (0.9907463499135798, 0.01047550118154667),
    (0.9982382226845667, 0.0045199615467215945),
]

EXAMPLE2_RULE_20 = [
    (1.7885486758102558e-08, 0.00011523469504263825),
    (7.155161652914053e-05, 0.005850387233745037),
    (0.0008356161580130342, 0.01621546136939642),
    (0.0037289725070694703, 0.029742159038797088),
    (0.010841226296519608, 0.045322220327996356),
    (0.02465036029632536, 0.061907685033178526),
    (0.04769927720500173, 0.07848331501742031),
    (0.08224791790589313, 0.0940768708638191),
    (0.12993765604008317, 0.10778485377987003),
    (0.19150387312943998, 0.11880283936542314),
    (0.26656819611889676, 0.12645525913197742),
    (0.3535342702011015, 0.13022161026435305),
    (0.44960088886379523, 0.12975708380221534),
    (0.5508947964730398, 0.12490623592648446),
    (0.6527136495431592, 0.11570882831668874),
    (0.7498586410744109, 0.10239741728426736),
    (0.8370272546298184, 0.0853867166243987),
    (0.9092304696789585, 0.06525528853880862),
    (0.9621965040807214, 0.04272165547761871),
    (0.9927316392129456, 0.018641580804642555),
]

EXAMPLE2_RULE_40 = [
    (1.1093514362142486e-09, 1.8057444657681708e-05),
    (4.455542301536994e-06, 0.0009211166333032888),
    (5.257879197495908e-05, 0.002584250043597587),
    (0.00023857885803177525, 0.004833980224769207),
    (0.000709751306838307, 0.007570288967053676),
    (0.0016619379108385249, 0.010712736841684651),
    (0.003333398487485228, 0.01418961936638368),
    (0.005997299350462611, 0.017933242068639596),
    (0.009953012741624483, 0.021877894697564508),
    (0.015516454181706534, 0.025959008876182795),
    (0.02300971058264673, 0.030112906557680737),
    (0.03275023137835733, 0.03427687191792621),
    (0.045039867503105624, 0.03838941073808661),
    (0.06015404846750059, 0.04239062098609493),
    (0.07833138590866938, 0.046222627958035944),
    (0.09976398286028763, 0.04983005321184696),
    (0.12458871181630048, 0.05316049558458998),
    (0.15287970184084276, 0.05616500807536267),
    (0.1846422460626953, 0.058798557911169114),
    (0.21980830659385084, 0.06102045953842166),
    (0.25823375507081436, 0.06279477206157422),
    (0.29969744458992525, 0.06409065404589132),
    (0.3439021638398964, 0.06488266976705398),
    (0.3904774778355577, 0.06515104201744787),
    (0.43898441297273816, 0.06488184752211969),
    (0.48892189830990607, 0.06406715190892798),
    (0.5397348311719791, 0.06270508203588851),
    (0.5908235944517841, 0.060799834313980346),
    (0.6415548163662007, 0.05836161848005358),
    (0.6912731318185537, 0.05540653707295125),
    (0.7393136787163263, 0.05195640164626037),
    (0.785015043244592, 0.048038487514455615),
    (0.827732355702157, 0.04368522958527006),
    (0.8668502334269697, 0.03893386261994402),
    (0.9017952698396716, 0.03382601023992868),
    (0.9320477791572515, 0.028407228822337316),
    (0.9571525267601761, 0.02272651844426072),
    (0.9767282170196278, 0.016835845666401086),
    (0.9904756707803709, 0.010790014028473644),
    (0.9981865197979181, 0.004653271235536551),
]
