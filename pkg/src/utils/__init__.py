# GF(2) linear algebra and minimum-weight search
