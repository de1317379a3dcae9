#pragma once

#define LEARNRK_VERSION "0.1.0"
