#pragma once

// Lookup tables for quantile-based S0 stable estimation, computed at
// double precision on the canonical grid axes by tools/mcculloch_tablegen.
// Do not edit by hand; regenerate with that tool.

#include <array>

namespace heavytail::estimation::tables {

inline constexpr std::array<double, 15> nu_alpha_axis = {2.4390000000000001, 2.5, 2.6000000000000001, 2.7000000000000002, 2.7999999999999998, 3, 3.2000000000000002, 3.5, 4, 5, 6, 8, 10, 15, 25};

inline constexpr std::array<double, 7> nu_beta_axis = {0, 0.10000000000000001, 0.20000000000000001, 0.29999999999999999, 0.5, 0.69999999999999996, 1};

inline constexpr std::array<std::array<double, 7>, 15> alpha_table = {{
    {{1.99949913, 1.99950547, 1.99950547, 1.99950547, 1.99950547, 1.99950547, 1.99950547}},
    {{1.91571671, 1.91835181, 1.91835181, 1.91835181, 1.91835181, 1.91835181, 1.91835181}},
    {{1.80921875, 1.81306502, 1.81664459, 1.81664459, 1.81664459, 1.81664459, 1.81664459}},
    {{1.72749451, 1.72866767, 1.7348729, 1.7348729, 1.7348729, 1.7348729, 1.7348729}},
    {{1.66201117, 1.66143369, 1.66170234, 1.66462278, 1.66462278, 1.66462278, 1.66462278}},
    {{1.56023215, 1.55784088, 1.55180388, 1.54636424, 1.54646542, 1.54646542, 1.54646542}},
    {{1.48222781, 1.47909864, 1.47062401, 1.45924495, 1.4497253, 1.4497253, 1.4497253}},
    {{1.39087392, 1.38748938, 1.37777421, 1.36345168, 1.33462537, 1.33382577, 1.33382577}},
    {{1.2774184, 1.27406396, 1.26488728, 1.25005927, 1.21126902, 1.1927229, 1.1927229}},
    {{1.12567801, 1.12291341, 1.11499428, 1.10199088, 1.0658976, 1.02412279, 1.01754713}},
    {{1.0251964, 1.02289208, 1.01613026, 1.00488059, 0.972522053, 0.933325029, 0.911616905}},
    {{0.896603341, 0.894755532, 0.889655988, 0.880940235, 0.854592165, 0.82073263, 0.786197586}},
    {{0.815714637, 0.814149617, 0.810001129, 0.80262673, 0.780706997, 0.750516146, 0.712017607}},
    {{0.698357074, 0.69731942, 0.694461017, 0.689674412, 0.673388698, 0.649723003, 0.609456612}},
    {{0.590151144, 0.589439436, 0.587351777, 0.583816117, 0.57246105, 0.555770287, 0.517231307}},
}};

inline constexpr std::array<std::array<double, 7>, 15> beta_table = {{
    {{0, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5}},
    {{0, 1.75187231, 2.5, 2.5, 2.5, 2.5, 2.5}},
    {{0, 0.712141346, 1.52054445, 2.31928792, 2.5, 2.5, 2.5}},
    {{0, 0.457329434, 1.00021993, 1.58115981, 2.5, 2.5, 2.5}},
    {{0, 0.346659509, 0.731204673, 1.21203102, 2.19329536, 2.5, 2.5}},
    {{0, 0.246063837, 0.501251222, 0.797359701, 1.62164556, 2.46342545, 2.5}},
    {{0, 0.199808309, 0.401110066, 0.615518326, 1.28498525, 2.09299854, 2.5}},
    {{0, 0.164024153, 0.326455232, 0.489615058, 0.922636267, 1.75016246, 2.5}},
    {{0, 0.134560757, 0.267373671, 0.397499439, 0.670752643, 1.35616045, 2.5}},
    {{0, 0.108145175, 0.21526235, 0.320614774, 0.529679546, 0.794290773, 2.5}},
    {{0, 0.0948983815, 0.18925747, 0.282666195, 0.468751717, 0.675608274, 2.5}},
    {{0, 0.0807472291, 0.161414547, 0.241950904, 0.404585736, 0.583371947, 2.5}},
    {{0, 0.0728873027, 0.145851462, 0.219219182, 0.368981389, 0.534364867, 2.5}},
    {{0, 0.0623886546, 0.125165282, 0.188647397, 0.320458992, 0.469043312, 2.5}},
    {{0, 0.053153643, 0.106799792, 0.161432904, 0.27655131, 0.409822872, 2.5}},
}};

inline constexpr std::array<double, 16> alpha_axis = {0.5, 0.59999999999999998, 0.69999999999999996, 0.80000000000000004, 0.90000000000000002, 1, 1.1000000000000001, 1.2000000000000002, 1.3, 1.3999999999999999, 1.5, 1.6000000000000001, 1.7000000000000002, 1.8, 1.9000000000000001, 2};

inline constexpr std::array<double, 5> beta_axis = {0, 0.25, 0.5, 0.75, 1};

inline constexpr std::array<std::array<double, 5>, 16> scale_table = {{
    {{2.56766555, 3.05146381, 4.50760125, 6.60027047, 9.09351989}},
    {{2.32420793, 2.62197546, 3.52783957, 4.78985054, 6.2228522}},
    {{2.18012844, 2.38250711, 2.99490673, 3.83295115, 4.76142153}},
    {{2.09106947, 2.23729263, 2.66986795, 3.25761536, 3.90346436}},
    {{2.03516682, 2.14391695, 2.45601479, 2.88112823, 3.3499324}},
    {{2, 2.0810364, 2.30784261, 2.6200584, 2.96858045}},
    {{1.97770466, 2.03712741, 2.20145925, 2.43155866, 2.69324565}},
    {{1.9630744, 2.00555625, 2.12320106, 2.29160272, 2.48768289}},
    {{1.95275788, 1.98222156, 2.06468082, 2.18576519, 2.33063565}},
    {{1.94473481, 1.96444639, 2.02043266, 2.10489586, 2.20898366}},
    {{1.93786636, 1.95044596, 1.9867242, 2.04292442, 2.11432452}},
    {{1.93154745, 1.93903734, 1.96093348, 1.9956813, 2.0411508}},
    {{1.92547572, 1.92945257, 1.94120748, 1.96024396, 1.98582538}},
    {{1.91951286, 1.92120877, 1.92626228, 1.9345735, 1.94598475}},
    {{1.91360612, 1.91402035, 1.91526088, 1.91732126, 1.9201909}},
    {{1.9077451, 1.9077451, 1.9077451, 1.9077451, 1.9077451}},
}};

inline constexpr std::array<std::array<double, 5>, 16> location_table = {{
    {{-0, -0.0608767061, -0.279429212, -0.658715618, -1.19810934}},
    {{-0, -0.0776266381, -0.271981102, -0.580996674, -0.99663811}},
    {{-0, -0.0888728902, -0.262059705, -0.51974301, -0.853268719}},
    {{-0, -0.0955094673, -0.250487323, -0.468534381, -0.742705117}},
    {{-0, -0.0983114348, -0.237596384, -0.423838176, -0.652469526}},
    {{-0, -0.0979574977, -0.223492106, -0.383477509, -0.575630144}},
    {{-0, -0.0950352221, -0.208178695, -0.34598085, -0.50796083}},
    {{-1.11022302e-16, -0.0900305522, -0.191620142, -0.310271143, -0.446671255}},
    {{-0, -0.0833210638, -0.173763672, -0.27550166, -0.389774748}},
    {{-0, -0.0751790096, -0.154540421, -0.240959638, -0.335741746}},
    {{-0, -0.0657801166, -0.133853042, -0.206000973, -0.283289315}},
    {{-0, -0.0552124692, -0.111556131, -0.169996569, -0.231235679}},
    {{-0, -0.0434813724, -0.0874311619, -0.132278047, -0.178380915}},
    {{1.11022302e-16, -0.0305072829, -0.0611535461, -0.092072347, -0.123387018}},
    {{-1.11022302e-16, -0.0161137072, -0.0322451956, -0.0484120657, -0.0646315623}},
    {{-0, -0, -0, -0, -0}},
}};

}  // namespace heavytail::estimation::tables
