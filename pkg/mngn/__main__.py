from mngn.main import main

main()
