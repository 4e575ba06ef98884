public class ReverseInteger {
    public static int main(String[] args) {
        int x = 1230;
        int sign = 1;
        if (x < 0) {
            sign = -1;
            x = -x;
        }
        int rev = 0;
        while (x > 0) {
            int digit = x % 10;
            rev = rev * 10 + digit;
            x = x / 10;
        }
        int result = rev * sign;
        return result;
    }
}
