#pragma once

#define LPIR_VERSION "0.1.0"
