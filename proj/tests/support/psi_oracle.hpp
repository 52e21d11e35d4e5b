// Generated by gen_psi_oracle.py (mpmath, 60 digits). Do not edit by hand.
#pragma once

namespace psi_oracle {

struct Point { double x; double digamma; double trigamma; };

inline constexpr Point points[] = {
    {0x1.47ae147ae147bp-7, -0x1.923e58c1e9645p+6, 0x1.388cf83ecc5f8p+13},  // x = 0.01
    {0x1.47ae147ae147bp-6, -0x1.945bba7f7cf52p+5, 0x1.38b323c8c326ep+11},  // x = 0.02
    {0x1.999999999999ap-5, -0x1.47f72c4f41c3fp+4, 0x1.918848921e2b7p+8},  // x = 0.05
    {0x1.1eb851eb851ecp-4, -0x1.d81b409b75ad6p+3, 0x1.9b2550646cd67p+7},  // x = 0.07
    {0x1.999999999999ap-4, -0x1.4d8f668552b02p+3, 0x1.95bbb2c5c8286p+6},  // x = 0.1
    {0x1.3333333333333p-3, -0x1.c157f4782b350p+2, 0x1.6e51ed82accc7p+5},  // x = 0.15
    {0x1.999999999999ap-3, -0x1.527fa131c6922p+2, 0x1.a4472d520fdb2p+4},  // x = 0.2
    {0x1.0000000000000p-2, -0x1.0e8e9943cd7c3p+2, 0x1.1328429d927c6p+4},  // x = 0.25
    {0x1.3333333333333p-2, -0x1.c052b6b5e6118p+1, 0x1.87da06bfa42ddp+3},  // x = 0.3
    {0x1.999999999999ap-2, -0x1.47db72e1bc88ep+1, 0x1.d19f713fc4030p+2},  // x = 0.4
    {0x1.0000000000000p-1, -0x1.f6a897d3214fcp+0, 0x1.3bd3cc9be45dep+2},  // x = 0.5
    {0x1.3333333333333p-1, -0x1.8a66055342aefp+0, 0x1.d16f5188f657ap+1},  // x = 0.6
    {0x1.8000000000000p-1, -0x1.15fafa86b04dbp+0, 0x1.455c4ff28f0bfp+1},  // x = 0.75
    {0x1.ccccccccccccdp-1, -0x1.8285c901c881bp-1, 0x1.ec2b942b352f6p+0},  // x = 0.9
    {0x1.0000000000000p+0, -0x1.2788cfc6fb619p-1, 0x1.a51a6625307d3p+0},  // x = 1
    {0x1.199999999999ap+0, -0x1.b1ecd0aa5604ep-2, 0x1.6eecb1720a1acp+0},  // x = 1.1
    {0x1.4000000000000p+0, -0x1.d1d32879af85dp-3, 0x1.328429d927c67p+0},  // x = 1.25
    {0x1.8000000000000p+0, 0x1.2aed059bd608ap-5, 0x1.de9e64df22ef3p-1},  // x = 1.5
    {0x1.c000000000000p+0, 0x1.fad2d675283d3p-3, 0x1.87385c3c034c4p-1},  // x = 1.75
    {0x1.0000000000000p+1, 0x1.b0ee6072093cep-2, 0x1.4a34cc4a60fa6p-1},  // x = 2
    {0x1.4000000000000p+1, 0x1.680425af12b5ep-1, 0x1.f62057f7296c9p-2},  // x = 2.5
    {0x1.8000000000000p+1, 0x1.d8773039049e7p-1, 0x1.94699894c1f4dp-2},  // x = 3
    {0x1.d99999999999ap+1, 0x1.2aca9308f7e52p+0, 0x1.3d7a906cdbdedp-2},  // x = 3.7
    {0x1.0cccccccccccdp+2, 0x1.4fb3e7d40c811p+0, 0x1.131ce6f817b34p-2},  // x = 4.2
    {0x1.4000000000000p+2, 0x1.8190ed71d7a49p+0, 0x1.c544f845f5b0bp-3},  // x = 5
    {0x1.799999999999ap+2, 0x1.b014ef13d4035p+0, 0x1.7a302668c26fep-3},  // x = 5.9
    {0x1.8000000000000p+2, 0x1.b4c420a50ad7cp+0, 0x1.735973273d5ecp-3},  // x = 6
    {0x1.8666666666666p+2, 0x1.b95dd41d77c92p+0, 0x1.6cc0c810ca38fp-3},  // x = 6.1
    {0x1.d333333333333p+2, 0x1.eaf646052b3cap+0, 0x1.2ca3427a86827p-3},  // x = 7.3
    {0x1.0000000000000p+3, 0x1.02008a3a23e5dp+1, 0x1.10aa239ffbc61p-3},  // x = 8
    {0x1.3000000000000p+3, 0x1.194f79882a636p+1, 0x1.c6a517beb619ep-4},  // x = 9.5
    {0x1.4000000000000p+3, 0x1.20396dc85cc95p+1, 0x1.aec2e54649b87p-4},  // x = 10
    {0x1.9666666666666p+3, 0x1.40383736d5245p+1, 0x1.4f8cd7f0ed1b8p-4},  // x = 12.7
    {0x1.0000000000000p+4, 0x1.5ed986558884dp+1, 0x1.082aa228320e4p-4},  // x = 16
    {0x1.9000000000000p+4, 0x1.9970650883155p+1, 0x1.4e522a00923fdp-5},  // x = 25
    {0x1.2a00000000000p+5, 0x1.cd556984e82acp+1, 0x1.bdcbae44fff5ep-6},  // x = 37.25
    {0x1.9000000000000p+5, 0x1.f37465ca59ec1p+1, 0x1.4afa8862d5319p-6},  // x = 50
    {0x1.9000000000000p+6, 0x1.26690d4274475p+2, 0x1.4952e891b603ap-7},  // x = 100
    {0x1.f400000000000p+7, 0x1.613ed369c9e4dp+2, 0x1.06ab42bc36741p-8},  // x = 250
    {0x1.f400000000000p+9, 0x1.ba1078189c03cp+2, 0x1.06466dfb5dfe0p-10},  // x = 1000
    {0x1.b580000000000p+11, 0x1.0521cb8e6b4c7p+3, 0x1.2ba2cd5aa0f14p-12},  // x = 3500
    {0x1.3880000000000p+13, 0x1.26bab2df571c9p+3, 0x1.a3738d2137254p-14},  // x = 10000
    {0x1.ee1c000000000p+14, 0x1.4b926cdac9d90p+3, 0x1.0945fd59f0406p-15},  // x = 31623
    {0x1.86a0000000000p+16, 0x1.7069d82dcebc1p+3, 0x1.4f8bc681cdfb5p-17},  // x = 100000
    {0x1.34d1000000000p+18, 0x1.9541445df50c2p+3, 0x1.a86f1fdc2768fp-19},  // x = 316228
    {0x1.e848000000000p+19, 0x1.ba18a88c907d1p+3, 0x1.0c6f82d72bcaap-20},  // x = 1e+06
    {0x1.2f1a9fbe76c8bp-5, -0x1.b8b835660284dp+4, 0x1.6e029cfd1a0c2p+9},  // x = 0.037
    {0x1.e847f00000000p+19, 0x1.ba18a78020f5dp+3, 0x1.0c6f8ba2f9689p-20},  // x = 1e+06
    {0x1.edd2f1a9fbe77p+6, 0x1.33f502faf1dfdp+2, 0x1.0a8018306e3dcp-7},  // x = 123.456
    {0x1.0000000000000p-1, -0x1.f6a897d3214fcp+0, 0x1.3bd3cc9be45dep+2},  // x = 0.5
};

inline constexpr int count = sizeof(points) / sizeof(points[0]);

}  // namespace psi_oracle
