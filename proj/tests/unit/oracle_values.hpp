#pragma once
// Generated by tests/oracles/oracle.py; do not edit by hand.

namespace oracle {
constexpr double kLogTheta1_p1e3 = 1.9326447339160655;
constexpr double kLogTheta2_p1e3 = 2.5915341272435975;
constexpr double kLogTheta3_p1e3 = 2.1743345285065654;
constexpr double kLambda1_r5 = 1.6094379124341004;
constexpr double kLambda1Prime_r5 = 0.20000000000000000;
constexpr double kLambda1Second_r5 = -0.040000000000000000;
constexpr double kLambda2_r50 = 5.2760776383165917;
constexpr double kLambda2Prime_r50 = 0.025112444372706629;
constexpr double kLambda2Second_r50 = -0.00052838597491815226;
constexpr double kLambda3_r1e7 = 19.920468523219732;
constexpr double kLambda3Prime_r1e7 = 1.0843598206452689e-7;
constexpr double kLambda3Second_r1e7 = -1.0900917604908463e-14;
constexpr double kSquarePatchV_x1em3 = 0.030244726754808208;
constexpr double kSquarePatchV_x1em4 = 0.0039455067126784840;
constexpr double kSquarePatchV_x1em5 = 0.00048665407498761023;
constexpr double kSquarePatchV_x0p25 = 2.0392809063332977;
constexpr double kSquarePatchV_r0p5_x1em3 = 0.027472138032561676;
constexpr double kLpNormM2_p50 = 1.6623849924609813;
constexpr double kLpNormM2_p100 = 2.0979290065001929;
constexpr double kLpNormM2_p200 = 2.5734830680677137;
constexpr double kLpNormM2_p400 = 3.0813433868825352;
constexpr double kRecoveredLogTheta1_p100 = 1.5505914814959202;
constexpr double kRecoveredLogTheta1_p500 = 1.8329554710065724;
constexpr double kBoundedLogX_a1em6_t1 = -11.782754405400775;
constexpr double kM2LogX_a1em8_t0p5 = -15.434727720618901;
constexpr double kOsgoodM1_1em12_1em3 = 1.3862943611198906;
constexpr double kDiniM1_1em4 = 0.0010210340371976183;
}  // namespace oracle
