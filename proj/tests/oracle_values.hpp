#pragma once
// Generated by tools/oracles/gen_oracles.py. Do not edit.

namespace oracle {

inline constexpr double kHighPass20[5] = {0.9149691441130826, -1.8299382882261652, 0.9149691441130826, -1.822694925196308, 0.8371816512560227};  // b0 b1 b2 a1 a2
inline constexpr double kLowPass5[5] = {0.00024135904904198073, 0.00048271809808396145, 0.00024135904904198073, -1.9555782403150352, 0.9565436765112033};
inline constexpr double kLowPass5GainAt50 = 0.009837056239817068;
inline constexpr double kLowPass5GainAt5 = 0.7071067811865498;

inline constexpr double kConvExample[4] = {-2.0, -2.0, -2.0, 3.0};
inline constexpr double kAdamFirstStep = -0.0009999999900000003;

inline constexpr int kWindows2800 = 21;
inline constexpr int kExamples12000H50 = 238;
inline constexpr int kPredictRows12000 = 251;
inline constexpr int kSynthLength10x1200 = 12000;

inline constexpr long kParamsH1[4] = {57713, 58537, 75809, 76633};  // SIC SIC_F DIC DIC_F
inline constexpr long kParamsH26[4] = {58938, 60162, 77034, 78258};  // SIC SIC_F DIC DIC_F
inline constexpr long kParamsH50[4] = {60114, 61722, 78210, 79818};  // SIC SIC_F DIC DIC_F
inline constexpr long kDense48to50 = 2450;

}  // namespace oracle
