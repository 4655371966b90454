#pragma once

// Generated by bessel_reference.py (mpmath, 50 digits). Do not edit.

namespace oracle {

struct BesselRow {
  double x;
  double k0;
  double k1;
};

inline constexpr BesselRow kBesselTable[] = {
    {1e-300, 6.908914594138721176542082e+2, 1.0e+300},
    {1e-30, 6.919348430547978296935046e+1, 1.0e+30},
    {1e-8, 1.853661225961077840936996e+1, 9.99999999999999048169387e+7},
    {1e-3, 7.02368880056238134361208, 9.999962381560855742779534e+2},
    {0.01, 4.721244730161094965135878, 9.997389411829624764303953e+1},
    {0.1, 2.427069024702016612518506, 9.853844780870606134848547},
    {0.5, 9.244190712276658617819242e-1, 1.656441120003300893696445},
    {1, 4.210244382407083333356274e-1, 6.0190723019723457473754e-1},
    {1.5, 2.13805562647525736721621e-1, 2.773878004568438160853597e-1},
    {1.9, 1.288459792760474798558268e-1, 1.596601530326676103820769e-1},
    {1.999, 1.140338305892329241386597e-1, 1.400498420771096828984558e-1},
    {2, 1.138938727495334356527196e-1, 1.398658818165224272845988e-1},
    {2.001, 1.137540987366846115981599e-1, 1.396821883017675349613291e-1},
    {2.5, 6.234755320036618602916953e-2, 7.389081634774706364899354e-2},
    {3, 3.473950438627924807234955e-2, 4.015643112819418437670578e-2},
    {5, 3.691098334042594274735261e-3, 4.044613445452164208365022e-3},
    {10, 1.778006231616765181130119e-5, 1.864877345382558459681686e-5},
    {30, 2.132477496463056371166896e-14, 2.167732001891549424867038e-14},
    {100, 4.656628229175902018939005e-45, 4.679853735636909286562544e-45},
    {450, 2.181806953539110366372567e-197, 2.184229839675603698405329e-197},
};

// F(J) = x K1(x) / K0(x) with x = exp(-2J), and the gap to
// 1 / (2J + log 2 - gamma).
struct ContinuumRow {
  double J;
  double F;
  double gap;
};

inline constexpr ContinuumRow kContinuumTable[] = {
    {-3, 4.039284844137802172308782e+2, 4.040984348490379226792631e+2},
    {-1, 7.874046750905048363130355, 8.404813019918599173056111},
    {-0.5, 3.183472232148422034407687, 4.314606321545074111348235},
    {0, 1.429625398260401758028108, 7.196156765637634445156698},
    {0.5, 7.472416522541152021246473e-1, 1.488706861540249074941727e-1},
    {1, 4.581564502688818880005357e-1, 1.44486376556348592908875e-2},
    {2, 2.42744946034830049496382e-1, 2.134210312053499242513788e-4},
    {3, 1.635037745939439781054605e-1, 3.615480607028194086901447e-6},
    {4, 1.232143816976158999776044e-1, 6.362768747344847268791132e-8},
    {5, 9.8853969794610037836467e-2, 1.137488874749333855543849e-9},
    {6, 8.253595676562441406408902e-2, 2.049788670871404115865836e-11},
    {8, 6.205040019115746832529271e-2, 6.737181102453595467626559e-15},
    {10, 4.971184154318637626202333e-2, 2.232398589045223723918167e-18},
    {20, 2.492775219764424452333953e-2, 9.252015184253374314285283e-36},
    {50, 9.988420272987193807945581e-3, 0.0},
    {200, 2.499275637968105529528086e-3, 0.0},
    {400, 1.249818883253207439026865e-3, 0.0},
};

// int_0^1 |2 Phi^{-1}(u) - Phi^{-1}(u)| du
inline constexpr double kW1Normal1vs4 = 7.978845608028653558798921e-1;

}  // namespace oracle
