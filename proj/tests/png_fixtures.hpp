#pragma once

// Tiny hand-built PNG files used by the codec tests.

#include <cstddef>

namespace fixtures {

// 2x2 RGB8: (10,20,30) (40,50,60) / (70,80,90) (200,100,50)
inline const unsigned char kPngRgb2x2[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52,
    0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0x08, 0x02, 0x00, 0x00, 0x00, 0xfd, 0xd4, 0x9a,
    0x73, 0x00, 0x00, 0x00, 0x16, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0xe0, 0x12, 0x91, 0xd3,
    0x30, 0xb2, 0x61, 0x70, 0x0b, 0x88, 0x3a, 0x91, 0x62, 0x04, 0x00, 0x0f, 0xea, 0x03, 0x21, 0x8b,
    0x89, 0xd8, 0xe6, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82,
};
inline const std::size_t kPngRgb2x2_len = sizeof(kPngRgb2x2);

// 3x2 gray8: 0 128 255 / 10 20 30
inline const unsigned char kPngGray3x2[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52,
    0x00, 0x00, 0x00, 0x03, 0x00, 0x00, 0x00, 0x02, 0x08, 0x00, 0x00, 0x00, 0x00, 0xb8, 0x1f, 0x39,
    0xc6, 0x00, 0x00, 0x00, 0x10, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0x68, 0xf8, 0xcf,
    0xc0, 0x25, 0x22, 0x07, 0x00, 0x08, 0x67, 0x01, 0xbc, 0x9c, 0x67, 0x35, 0xa0, 0x00, 0x00, 0x00,
    0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82,
};
inline const std::size_t kPngGray3x2_len = sizeof(kPngGray3x2);

// 2x1 RGBA8: (1,2,3,255) (4,5,6,128); alpha is stripped on read
inline const unsigned char kPngRgba2x1[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52,
    0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x01, 0x08, 0x06, 0x00, 0x00, 0x00, 0xf4, 0x22, 0x7f,
    0x8a, 0x00, 0x00, 0x00, 0x11, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0x64, 0x62, 0xfe,
    0xcf, 0xc2, 0xca, 0xd6, 0x00, 0x00, 0x05, 0xd7, 0x01, 0x95, 0xfa, 0x76, 0x67, 0x75, 0x00, 0x00,
    0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82,
};
inline const std::size_t kPngRgba2x1_len = sizeof(kPngRgba2x1);

// 2x1 16-bit gray; the reader must reject it
inline const unsigned char kPngGray16[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52,
    0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x01, 0x10, 0x00, 0x00, 0x00, 0x00, 0x81, 0xd9, 0xfc,
    0x15, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0x7e, 0x31, 0xc7,
    0x01, 0x00, 0x04, 0x41, 0x01, 0xc8, 0x12, 0x7a, 0xe8, 0xa0, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45,
    0x4e, 0x44, 0xae, 0x42, 0x60, 0x82,
};
inline const std::size_t kPngGray16_len = sizeof(kPngGray16);

} // namespace fixtures
